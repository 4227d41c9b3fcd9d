"""Discrete-event simulator for caching strategies in content-centric networks."""
from .config import ScenarioConfig, load_config, presets
from .engine import MetricsReport, run, traffic_savings

__version__ = "0.1.0"

__all__ = ["ScenarioConfig", "MetricsReport", "load_config", "presets", "run", "traffic_savings"]
