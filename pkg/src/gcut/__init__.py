"""Guillotine-cutting MILP toolkit: model compiler, exact oracle, verification."""

from .discretize import PositionSet, cut_positions, normalize_dim, restricted_positions
from .enumeration import (
    Cut,
    Extraction,
    Plate,
    PlateGraph,
    enumerate_bba,
    enumerate_fmt,
    extraction_eligible,
)
from .hybridise import HybridisationConfig, hybridise_graph, replaceable
from .instance import (
    Instance,
    PieceType,
    expand_rotation,
    parse_instance,
    parse_instance_text,
    serialize_instance,
)
from .model import MilpModel, build_model, model_stats, render_mps, write_mps
from .oracle import oracle_feasible, oracle_optimal
from .render import read_placement, render_svg, write_placement
from .solve import VarAssignment, external_solve, solve_model
from .verify import (
    CheckReport,
    CuttingTree,
    Placement,
    PlacedRect,
    check_solution,
    decode,
    is_guillotinable,
    placement_from_tree,
)

__all__ = [name for name in dir() if not name.startswith("_")]
__version__ = "0.1.0"
