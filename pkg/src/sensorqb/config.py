"""Service and CLI configuration: TOML file plus flag overrides."""

from __future__ import annotations

import importlib.resources
import os
from dataclasses import dataclass, field, replace
from typing import Optional

import tomli

from .client import EndpointConfig
from .compiler import DEFAULT_LAT_PROPERTY_IRI, DEFAULT_LON_PROPERTY_IRI, CompileOptions
from .errors import ConfigError
from .model import DEFAULT_LIMIT, is_absolute_iri

DEFAULT_ENDPOINT_URL = "http://127.0.0.1:3030/sparql"
DEFAULT_LISTEN = "127.0.0.1:8080"


@dataclass(frozen=True)
class ServiceConfig:
    endpoint: EndpointConfig = field(default_factory=lambda: EndpointConfig(DEFAULT_ENDPOINT_URL))
    discovery_query_override: Optional[str] = None
    geo_lat_property_iri: str = DEFAULT_LAT_PROPERTY_IRI
    geo_lon_property_iri: str = DEFAULT_LON_PROPERTY_IRI
    default_limit: int = DEFAULT_LIMIT
    examples_path: Optional[str] = None  # None selects the bundled examples
    listen_address: str = DEFAULT_LISTEN

    def compile_options(self) -> CompileOptions:
        return CompileOptions(self.geo_lat_property_iri, self.geo_lon_property_iri)


def bundled_data_path(name: str) -> str:
    """Filesystem path of a bundled data file (fixture, examples)."""
    return str(importlib.resources.files("sensorqb").joinpath("data", name))


def _check(config: ServiceConfig) -> ServiceConfig:
    for label, iri in (
        ("geo.lat_property_iri", config.geo_lat_property_iri),
        ("geo.lon_property_iri", config.geo_lon_property_iri),
    ):
        if not is_absolute_iri(iri):
            raise ConfigError(f"{label} is not an absolute IRI: {iri!r}")
    if config.default_limit < 1:
        raise ConfigError("service.default_limit must be at least 1")
    if config.examples_path is not None and not os.path.exists(config.examples_path):
        raise ConfigError(f"examples file does not exist: {config.examples_path}")
    return config


def load_config(path: Optional[str] = None) -> ServiceConfig:
    """Read a TOML config file; with no path, return checked defaults."""
    if path is None:
        return _check(ServiceConfig())
    try:
        with open(path, "rb") as fh:
            raw = tomli.load(fh)
    except FileNotFoundError:
        raise ConfigError(f"config file not found: {path}") from None
    except tomli.TOMLDecodeError as exc:
        raise ConfigError(f"config file is not valid TOML: {exc}") from None

    endpoint_raw = raw.get("endpoint", {})
    try:
        endpoint = EndpointConfig(
            url=endpoint_raw.get("url", DEFAULT_ENDPOINT_URL),
            timeout_seconds=float(endpoint_raw.get("timeout_seconds", 30.0)),
            method=endpoint_raw.get("method", "POST"),
            extra_headers=tuple(
                (str(k), str(v)) for k, v in endpoint_raw.get("headers", {}).items()
            ),
        )
    except ValueError as exc:
        raise ConfigError(str(exc)) from None

    discovery_raw = raw.get("discovery", {})
    geo_raw = raw.get("geo", {})
    service_raw = raw.get("service", {})
    config = ServiceConfig(
        endpoint=endpoint,
        discovery_query_override=discovery_raw.get("query"),
        geo_lat_property_iri=geo_raw.get("lat_property_iri", DEFAULT_LAT_PROPERTY_IRI),
        geo_lon_property_iri=geo_raw.get("lon_property_iri", DEFAULT_LON_PROPERTY_IRI),
        default_limit=int(service_raw.get("default_limit", DEFAULT_LIMIT)),
        examples_path=service_raw.get("examples_path"),
        listen_address=service_raw.get("listen", DEFAULT_LISTEN),
    )
    return _check(config)


def with_overrides(
    config: ServiceConfig,
    endpoint_url: Optional[str] = None,
    listen: Optional[str] = None,
    discovery_query: Optional[str] = None,
) -> ServiceConfig:
    if endpoint_url is not None:
        try:
            config = replace(config, endpoint=replace(config.endpoint, url=endpoint_url))
        except ValueError as exc:
            raise ConfigError(str(exc)) from None
    if listen is not None:
        config = replace(config, listen_address=listen)
    if discovery_query is not None:
        config = replace(config, discovery_query_override=discovery_query)
    return config
