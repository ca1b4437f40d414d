# Default quadrature resolutions, keyed by sphere parameter n (the sphere is S^{2n+1}).
# product: polar axes then azimuth on S^{2n+1}.
# sliced: colatitude slices x product grid on each parallel S^{2n}.
default_grids = {
    1: {
        'product': {'kind': 'product', 'resolution': [64, 64, 64]},
        'sliced': {'kind': 'sliced', 'slices': 48, 'parallel': [48, 96]},
        'parallel': [64, 128],
    },
    2: {
        'product': {'kind': 'product', 'resolution': [16, 16, 16, 16, 32]},
        'sliced': {'kind': 'sliced', 'slices': 40, 'parallel': [24, 24, 24, 48]},
        'parallel': [24, 24, 24, 48],
    },
    3: {
        'product': {'kind': 'product', 'resolution': [12, 12, 12, 12, 12, 12, 24]},
        'sliced': {'kind': 'sliced', 'slices': 24, 'parallel': [12, 12, 12, 12, 12, 24]},
        'parallel': [12, 12, 12, 12, 12, 24],
    },
}

# Resolution of the product grid on S^m used for degree integrals.
degree_grid = {2: [48, 96], 4: [16, 16, 16, 32], 6: [8, 8, 8, 8, 8, 16]}

# Colatitudes at which pole limits are sampled, largest first.
pole_colatitudes = (0.2, 0.1, 0.05)

# Distance below which a point counts as singular for a field.
singular_distance = 1e-8

# Central-difference step for fields without closed-form derivatives.
fd_step = 1e-5

# Nodes per evaluation chunk in grid reductions.
chunk_size = 2 ** 15

# Monte Carlo draws are generated in blocks of this size, one child seed per block.
mc_block = 2 ** 16

# Entry range for random shape arrays in the lemma prober.
probe_entry_range = (-2.0, 2.0)

field_kinds = ('hopf', 'radial', 'power', 'perturbed-hopf')
grid_kinds = ('product', 'parallel', 'sliced', 'monte-carlo')
