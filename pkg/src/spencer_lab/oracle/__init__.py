from .compare import compare_with_tower
from .jets import truncated_solution_dim

__all__ = ["compare_with_tower", "truncated_solution_dim"]
