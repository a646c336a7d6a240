"""Observation query builder for SOSA sensor graphs.

A query is described by an abstract JSON document (model), compiled
deterministically to SPARQL SELECT text (compiler), executed against an
endpoint (client) or evaluated locally (sparql_subset/sparql_eval and
direct_eval, which double as differential-testing oracles). Discovery
enumerates sensors from a SOSA endpoint, the nlu module turns chat
messages into document mutations, and service/cli expose everything over
HTTP and the command line.
"""

from .client import EndpointConfig, execute_select, parse_results_json
from .compiler import (
    CompileOptions,
    DEFAULT_OPTIONS,
    SparqlQueryText,
    VarTable,
    allocate_vars,
    compile_query,
    render_filter,
    render_geo,
)
from .direct_eval import eval_direct
from .discovery import (
    SensorCatalog,
    SensorDescriptor,
    default_discovery_query,
    discover_sensors,
    infer_datatype,
)
from .model import (
    AbstractQuery,
    AddFilter,
    AddGeoCircle,
    ClearDateWindow,
    ClearFilters,
    Contain,
    DateWindow,
    DeselectSensor,
    Diagnostic,
    Equals,
    FILTER_LEGALITY,
    GeoCircle,
    GeoCombinator,
    GeoFilterSet,
    Match,
    PropertyBinding,
    Range,
    Regex,
    SelectSensor,
    SensorSelection,
    SetDateWindow,
    SetGeoCombinator,
    SetHidden,
    SetLimit,
    SetOptional,
    XsdType,
    apply_mutation,
    empty_query,
    parse_query,
    serialize_query,
    validate_query,
)
from .rdf import Graph, Iri, Literal, Triple, load_ntriples, parse_ntriples
from .sparql_eval import evaluate
from .sparql_subset import parse_sparql_subset
from .table import Cell, ResultTable

__version__ = "0.1.0"
