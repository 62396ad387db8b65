# defaults.py

# Defaults used when a config file or flag leaves a value out.
# Nested tables mirror the TOML layout read by config.load_config.
DEFAULT_CONFIG = {
    "run": {
        "mode": "additive",       # "additive" or "multiplicative"
        "seed": 0,
        "strict": False,          # invariant failures raise instead of being reported
        "workers": 1,             # FFT workers and thread-pool size
        "horizon": None,          # optional cap on the construction window end time
        "window_start": None,     # optional start of the last stage window; None: its stage start
    },
    "schedule": {
        "a": 5,
        "b": 2,
        "beta": 0.51,
        "alpha": 1.25,
        "gamma": 1.0,
        "sigma": 0.1,
        "Q": 2,                   # stage blocks q = 0..Q-1
        "L": 4.0,                 # multiplicative horizon
    },
    "grid": {
        "N": 128,
        "samples_per_tau": 8,
        "dt": None,               # None: finest tau / samples_per_tau
        "flow_points": None,      # None: sized from the stress band
        "flow_substeps": 1,
    },
    "noise": {
        "amplitude": 1.0,         # 0.0 gives the zero-noise realization
        "eta": 0.02,
        "band": None,             # None: grid dealias radius
        "delta": 0.1,
        "probes": 64,             # probe fields per measured constant
        "mc_paths": 0,
        "mc_horizon": 2.0,
        "mc_levels": [],          # extra L values for the survival table
        "mc_dt": 1e-3,
    },
    "energy": {
        "kind": "affine",
        "d0": 10.0,
        "d1": 1.0,
        "times": [],
        "values": [],
        "branch_d1": None,
        "branch_time": 0.0,
    },
    "tolerances": {
        "ball_slack": 1e-3,
        "energy_quadrature": 0.1,
        "divergence": 1e-10,
        "residual": 1e-6,
        "imaginary": 1e-12,
    },
    "output": {
        "directory": "msqg_out",
        "checkpoints": True,
        "checkpoint_samples": 1,  # trailing time samples written per field checkpoint
        "logging": False,
        "log_file": None,
    },
}
