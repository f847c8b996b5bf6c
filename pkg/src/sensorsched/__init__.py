from sensorsched.cli import cli

__all__ = ["cli"]
