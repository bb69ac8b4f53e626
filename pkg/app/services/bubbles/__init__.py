# Bubbles package
