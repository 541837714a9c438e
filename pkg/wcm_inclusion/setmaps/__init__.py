from wcm_inclusion.setmaps.set_valued_map import set_valued_map, sample_grid, closed_graph_check
from wcm_inclusion.setmaps.constant_map import constant_map
from wcm_inclusion.setmaps.linear_map import linear_map
from wcm_inclusion.setmaps.pl_subdifferential_map import pl_convex_function, pl_subdifferential_map
from wcm_inclusion.setmaps.table_map import half_space, region, table_map
from wcm_inclusion.setmaps.problem_spec import (
    build_map,
    families,
    map_kinds,
    parse_problem,
    problem_spec,
    strategies,
)
