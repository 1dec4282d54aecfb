from cartography.contours import (
    CONTOUR_COLUMNS,
    ESTIMATORS,
    ContourLine,
    phase_boundary_curve,
    trace_contour,
)
from cartography.grids import (
    GRID_COLUMNS,
    METRICS,
    MetricGrid,
    evaluate_cell,
    evaluate_grid,
    metric_value,
    parse_grid,
)
from cartography.tables import (
    AspectTable,
    compare_estimators,
    historical_contour_r,
    parametric_contour_r,
    required_aspect_table,
)

__all__ = [
    "CONTOUR_COLUMNS",
    "ESTIMATORS",
    "GRID_COLUMNS",
    "METRICS",
    "AspectTable",
    "ContourLine",
    "MetricGrid",
    "compare_estimators",
    "evaluate_cell",
    "evaluate_grid",
    "historical_contour_r",
    "metric_value",
    "parametric_contour_r",
    "parse_grid",
    "phase_boundary_curve",
    "required_aspect_table",
    "trace_contour",
]
