# Updater tests package
