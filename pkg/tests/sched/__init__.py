# Sched tests package
