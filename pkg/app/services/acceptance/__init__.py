# Acceptance package
