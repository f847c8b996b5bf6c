# Sim tests package
