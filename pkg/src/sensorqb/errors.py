"""Exception types shared across the package."""

from __future__ import annotations


class SensorQbError(Exception):
    """Base class for all package errors."""


class DocumentSyntaxError(SensorQbError):
    """Query-document text is not well-formed JSON."""


class SchemaError(SensorQbError):
    """Query-document JSON violates the document schema.

    Carries the JSON path of the offending value.
    """

    def __init__(self, path: str, message: str):
        super().__init__(f"{path}: {message}")
        self.path = path
        self.message = message


class ValidationFailed(SensorQbError):
    """A document with fatal diagnostics was passed where a compilable one is required."""

    def __init__(self, diagnostics):
        super().__init__("; ".join(str(d) for d in diagnostics) or "validation failed")
        self.diagnostics = list(diagnostics)


class TargetNotFound(SensorQbError):
    """A mutation referenced a sensor or property that is not in the document."""


class InvariantViolation(SensorQbError):
    """A mutation would produce an invalid document."""


class IllegalFilter(SensorQbError):
    """Filter variant is not legal for the property datatype."""


class EmptyGeoSet(SensorQbError):
    """Geo rendering was asked for a filter set with no circles."""


class GeoWithoutCoordinates(SensorQbError):
    """A geo filter is present but a selected sensor has no latitude/longitude bindings."""


class SubsetSyntaxError(SensorQbError):
    """SPARQL text fell outside the supported subset grammar."""

    def __init__(self, message: str, line: int, column: int, token: str = ""):
        loc = f"line {line}, column {column}"
        if token:
            loc += f" at {token!r}"
        super().__init__(f"{message} ({loc})")
        self.line = line
        self.column = column
        self.token = token


class NetworkError(SensorQbError):
    """Connection or timeout failure talking to an endpoint."""


class EndpointError(SensorQbError):
    """Endpoint answered with an HTTP error status."""

    def __init__(self, status: int, body_excerpt: str):
        super().__init__(f"endpoint returned HTTP {status}: {body_excerpt[:200]}")
        self.status = status
        self.body_excerpt = body_excerpt


class DecodeError(SensorQbError):
    """A results document could not be decoded."""


class OverrideShapeError(SensorQbError):
    """A discovery override query is missing required projection variables."""


class ConfigError(SensorQbError):
    """Service configuration is unusable."""


class BindError(SensorQbError):
    """The service could not bind its listen address."""
