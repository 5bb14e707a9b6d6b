"""
Convenience functions for dependency injection.

This module provides simple functions to get commonly used services
without needing to understand the full dependency injection setup.
"""

from dependency_injector import containers

from multiview_cvae.common.telemetry import TelemetryService
from multiview_cvae.container import create_container
from multiview_cvae.evaluation.evaluator import Evaluator
from multiview_cvae.training.trainer import Trainer

# Global container instance
_container: containers.DynamicContainer | None = None


def get_container() -> containers.DynamicContainer:
    """
    Get the global application container, creating it if necessary.

    Returns:
        DynamicContainer: The configured container
    """
    global _container
    if _container is None:
        _container = create_container()
    return _container


def get_telemetry() -> TelemetryService:
    return get_container().telemetry()


def get_trainer() -> Trainer:
    """
    Get a trainer for the environment-configured variant and schedule.

    Returns:
        Trainer: Trainer with telemetry and variant injected
    """
    return get_container().trainer()


def get_evaluator() -> Evaluator:
    return get_container().evaluator()


def reset_container() -> None:
    """
    Reset the global container (useful for testing).
    """
    global _container
    _container = None
