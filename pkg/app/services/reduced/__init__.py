# Reduced energy package
