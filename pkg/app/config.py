"""Configuration management for the decomposable-norm laboratory."""

import os
from dotenv import load_dotenv

load_dotenv()


class Config:
    """Application configuration."""
    
    # Logging
    LOG_LEVEL: str = os.getenv("LOG_LEVEL", "INFO")
    
    # Experiments
    LAB_SEED: int = int(os.getenv("LAB_SEED", "20240917"))
    LAB_TRIALS: int = int(os.getenv("LAB_TRIALS", "30"))
    LAB_RESTARTS: int = int(os.getenv("LAB_RESTARTS", "64"))
    LAB_TOL_SCALE: float = float(os.getenv("LAB_TOL_SCALE", "1.0"))
    
    # SDP engine
    SDP_ABSTOL: float = float(os.getenv("SDP_ABSTOL", "1e-8"))
    SDP_RELTOL: float = float(os.getenv("SDP_RELTOL", "1e-7"))
    SDP_FEASTOL: float = float(os.getenv("SDP_FEASTOL", "1e-8"))
    SDP_MAXITER: int = int(os.getenv("SDP_MAXITER", "500"))
    
    # Linear algebra
    PSD_TOL: float = float(os.getenv("PSD_TOL", "1e-8"))
    JACOBI_MAX_SWEEPS: int = int(os.getenv("JACOBI_MAX_SWEEPS", "60"))
    
    # Norm estimation (Schatten ascent)
    PNORM_MAX_ITER: int = int(os.getenv("PNORM_MAX_ITER", "300"))
    PNORM_WORKERS: int = int(os.getenv("PNORM_WORKERS", "1"))
    
    # Reports
    REPORT_PRECISION: int = int(os.getenv("REPORT_PRECISION", "10"))


config = Config()
