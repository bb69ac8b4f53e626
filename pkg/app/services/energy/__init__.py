# Energy package
