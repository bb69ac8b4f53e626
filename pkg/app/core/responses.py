"""
Unified report schemas for CLI runs.
"""
from typing import Optional, Any, Dict
from pydantic import BaseModel


class RunReport(BaseModel):
    """Standard report wrapper written for every subcommand."""
    success: bool
    service: str
    version: str
    subcommand: str
    config: Dict[str, Any]
    data: Optional[Any] = None
    error: Optional[Dict[str, Any]] = None
