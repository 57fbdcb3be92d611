# Experiment batteries, files and reports
