# Openworld tests package
