"""Subgroups of free groups through Stallings graphs."""

from .words import (Basis, ParseError, Word, concat_reduced, cyclic_reduce, format_word,
                    invert, parse_word, reduce)
from .graph import (CoreDecomposition, GraphMorphism, StallingsGraph, Step, StepKind,
                    add_generator, build_graph, canonical_form, conjugate, decompose, fold,
                    free_rank, homomorphism, index_r_subgroup, intersect, is_fi_extension,
                    join, membership, path_read)
from .fi import (ExtensionLattice, VertexPartition, commensurator, enumerate_fi_extensions,
                 fi_equivalent, fi_extension_bound, identify_and_fold, is_identification_fi,
                 nerode_partition, sim_by_product_covers, subspace_count,
                 validate_extension_language)
from .malnormal import (fiber_square, infinite_intersection_pairs, is_malnormal,
                        malnormal_closure)
