from .supersat_agent import create_supersat_agent

__all__ = ["create_supersat_agent"]
