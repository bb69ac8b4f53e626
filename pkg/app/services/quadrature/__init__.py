# Quadrature package
