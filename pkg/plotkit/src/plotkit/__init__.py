from .render import FigureSpec, MissingCell, SchemaError, aggregate, read_rows, render, switch_table

__all__ = [
    "FigureSpec",
    "MissingCell",
    "SchemaError",
    "aggregate",
    "read_rows",
    "render",
    "switch_table",
]
