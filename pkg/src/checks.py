"""
Check Registry for berrylab

This module provides a registry of numerical self-checks. Checks are grouped
(special, field, geometry) and run by the `selfcheck` subcommand, which prints
one PASS/FAIL line per check.
"""

from typing import Dict, List, Any, Optional
from abc import ABC, abstractmethod
from dataclasses import dataclass, field
from enum import Enum
import logging


logger = logging.getLogger(__name__)


class CheckGroup(str, Enum):
    """Groups of self-checks."""
    SPECIAL = "special"
    FIELD = "field"
    GEOMETRY = "geometry"


@dataclass
class CheckConfig:
    """Configuration for a check."""
    name: str
    group: CheckGroup
    description: str
    parameters: Dict[str, Any] = field(default_factory=dict)
    enabled: bool = True


@dataclass
class CheckResult:
    """Result from running a check."""
    name: str
    passed: bool
    detail: str = ""
    error: Optional[str] = None

    def line(self) -> str:
        status = "PASS" if self.passed else "FAIL"
        note = self.error if self.error else self.detail
        return f"{status} {self.name}" + (f": {note}" if note else "")


class Check(ABC):
    """Abstract base class for all checks."""

    def __init__(self, config: CheckConfig):
        self.config = config

    @abstractmethod
    def run(self) -> CheckResult:
        """Run the check."""
        pass

    def result(self, passed: bool, detail: str = "") -> CheckResult:
        return CheckResult(name=self.name, passed=bool(passed), detail=detail)

    @property
    def name(self) -> str:
        return self.config.name

    @property
    def group(self) -> CheckGroup:
        return self.config.group

    @property
    def description(self) -> str:
        return self.config.description


class CheckRegistry:
    """Registry for managing checks."""

    def __init__(self):
        self._checks: Dict[str, Check] = {}

    def register_check(self, check: Check):
        """Register a check instance."""
        self._checks[check.name] = check

    def register_config(self, config: CheckConfig, check_class: type):
        """Register a check configuration and its class."""
        if config.enabled:
            self._checks[config.name] = check_class(config)

    def get_check(self, name: str) -> Optional[Check]:
        """Get a check by name."""
        return self._checks.get(name)

    def list_checks(self, group: Optional[CheckGroup] = None) -> List[Check]:
        """Checks in registration order, optionally restricted to one group."""
        if group is None:
            return list(self._checks.values())
        group = CheckGroup(group)
        return [c for c in self._checks.values() if c.group == group]

    def run_check(self, name: str) -> CheckResult:
        """Run a check by name; exceptions become failed results."""
        check = self.get_check(name)
        if not check:
            return CheckResult(name, False, error=f"Check '{name}' not found")
        try:
            return check.run()
        except Exception as e:
            logger.warning("Check %s raised: %s", name, e)
            return CheckResult(name, False, error=f"Check raised {type(e).__name__}: {e}")

    def run_group(self, group: CheckGroup) -> List[CheckResult]:
        """Run every check of a group.

        Raises:
            ValueError: If the group is unknown
        """
        try:
            group = CheckGroup(group)
        except ValueError:
            raise ValueError(f"Unknown check group: {group}")
        return [self.run_check(c.name) for c in self.list_checks(group)]


# Global registry instance
_check_registry = None

def get_check_registry() -> CheckRegistry:
    """Get the global check registry instance."""
    global _check_registry
    if _check_registry is None:
        _check_registry = CheckRegistry()
        _initialize_default_checks(_check_registry)
    return _check_registry

def reset_check_registry():
    """Reset the global check registry (for testing)."""
    global _check_registry
    _check_registry = None

def _initialize_default_checks(registry: CheckRegistry):
    """Initialize default checks."""
    # Import here to avoid circular imports
    from . import selfcheck

    for config in selfcheck.DEFAULT_CHECKS:
        check_class = selfcheck.CHECK_CLASSES.get(config.name)
        if check_class:
            registry.register_config(config, check_class)
