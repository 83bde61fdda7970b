"""Bernoulli digraph sampling, inter-point distance distributions, and
branching-process approximations with Monte Carlo verification."""

from .approximation import (ApproxParams, TailEstimate, extinction_prob, joint_tail,
                            joint_tail_grid, laplace_w, laplace_w_batch, scale_params,
                            undirected_tail, undirected_tail_grid, w_hat)
from .branching import (GenerationSeq, LimitSample, MeanMatrix, TriGenerationSeq,
                        bgw_generations, coupled_digraph_tribgw, coupled_graph_bgw,
                        gap_bounds, mean_matrix, mean_matrix_power, tri_generations,
                        tri_mean_vector, tri_params, tri_w_sample, tri_w_sample_batch,
                        truncation_depth, w_sample, w_sample_batch)
from .errors import (CapacityError, DomainError, IngestionError, NumericalError,
                     ParameterError)
from .graph_model import (Digraph, Graph, count_pair_states, digraph_from_arcs,
                          edge_probability_out, export_edge_list, graph_from_edges,
                          load_edge_list, sample_digraph, sample_graph,
                          undirected_projection)
from .harness import (ScalingStudy, TailCell, TailTable, compare, empirical_joint_tail,
                      realnet_summary, sample_joint_distances, scaling_study)
from .neighbourhoods import (RingProfile, directed_rings, hat_ring_decomposition,
                             joint_distance, reed_frost_batch, reed_frost_trajectory,
                             restricted_rings, undirected_rings)
from .rand_kit import (RandomStream, StreamOrigin, derive_stream, sample_binomial,
                       sample_binomial_coupled, sample_hypergeometric,
                       sample_multinomial0, sample_poisson, sample_poisson_coupled)

__version__ = "0.1.0"
