from .helpers import ERROR_CELL_LIMIT, error_cell, parse_since, records_since

__all__ = ['ERROR_CELL_LIMIT', 'error_cell', 'parse_since', 'records_since']
