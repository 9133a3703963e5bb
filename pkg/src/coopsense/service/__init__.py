"""Service subpackage: FastAPI app and schemas."""
