# Pydantic models for input files and reports
