"""HTTP run service: submit scenarios, poll status, fetch results."""

from inspectsim.service.app import create_app

__all__ = ["create_app"]
