"""HTTP surface: FastAPI app factory and the pydantic wire schemas."""

from .app import create_app

__all__ = ["create_app"]
