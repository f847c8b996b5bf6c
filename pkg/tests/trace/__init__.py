# Trace tests package
