# Storage tests package
