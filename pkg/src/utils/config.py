from pydantic_settings import BaseSettings


class Settings(BaseSettings):
    """Toolkit settings"""

    # Inequality checks
    eps_check: float = 1e-9             # relative slack: margin >= -eps*(1+|values|)
    i1_threshold: float = 10.0          # phi(x)/x at the right grid end

    # Default verification grid (x=0 plus geometric points)
    grid_points: int = 2048
    grid_lo: float = 1e-3
    grid_hi: float = 1e3

    # Adaptive conjugation
    adaptive_tol: float = 1e-10
    bracket_cap_log2: int = 60
    coarse_scan_points: int = 2049
    max_search_iterations: int = 400

    # Derivatives and truncation budgets
    alpha_cap: int = 60
    alpha_budget: int = 48
    beta_budget: int = 40
    k_budget: int = 48
    series_terms: int = 200

    # Sup search
    sup_box_half_width: float = 6.0
    sup_grid_points_1d: int = 257
    sup_grid_points_2d: int = 65
    sup_grid_points_nd: int = 33       # 3-D and 4-D searches (x, y) for n = 2
    sup_refine_rounds: int = 4
    sup_growth_factor: float = 1.5
    sup_max_expansions: int = 8
    radial_nodes: int = 512

    # Cauchy quadrature
    cauchy_nodes: int = 128

    # Fourier
    fourier_box: float = 12.0
    fourier_samples: int = 256

    # Runs
    default_seed: int = 0x5EED
    output_dir: str = "results"
    log_level: str = "INFO"

    class Config:
        env_file = ".env"
        case_sensitive = False


settings = Settings()
