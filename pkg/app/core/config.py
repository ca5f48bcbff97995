# app/core/config.py
from pydantic import Field
from pydantic_settings import BaseSettings, PydanticBaseSettingsSource, SettingsConfigDict


class Settings(BaseSettings):
    """Numerical knobs shared by every module. Values are atomic units / dimensionless."""

    model_config = SettingsConfigDict(frozen=True, extra="forbid")

    # Tridiagonal eigensolver
    sturm_abs_tol: float = Field(1e-13, gt=0)
    sturm_rescale_low: float = Field(1e-150, gt=0)
    sturm_rescale_high: float = Field(1e150, gt=0)
    newton_steps: int = Field(3, ge=0)
    bisection_max_iter: int = Field(200, ge=10)

    # Quartic roots
    root_polish_tol: float = Field(1e-13, gt=0)
    double_root_tol: float = Field(1e-9, gt=0)
    root_pair_tol: float = Field(1e-7, gt=0)

    # Critical set
    critical_curve_samples: int = Field(400, ge=8)

    # Action quadrature and EBK
    quad_nodes: int = Field(64, ge=2)
    quad_max_nodes: int = Field(1024, ge=2)
    quad_tol: float = Field(1e-10, gt=0)
    ebk_tol: float = Field(1e-10, gt=0)

    # Shooting oracle
    frobenius_terms: int = Field(6, ge=1)
    frobenius_step: float = Field(1e-3, gt=0)
    xi_max_factor: float = Field(30.0, gt=0)
    shoot_rtol: float = Field(1e-10, gt=0)
    shoot_atol: float = Field(1e-12, gt=0)
    shoot_tol: float = Field(1e-8, gt=0)
    scan_points_per_state: int = Field(40, ge=4)

    # Lattice transport
    snap_ambiguity: float = Field(0.1, gt=0, lt=1)
    loop_half_height: float = Field(1.0, gt=0)   # in local level spacings of the center column

    # Reduction
    casimir_tol: float = Field(1e-8, gt=0)
    bifurcation_rtol: float = Field(1e-12, gt=0)

    @classmethod
    def settings_customise_sources(
        cls,
        settings_cls: type[BaseSettings],
        init_settings: PydanticBaseSettingsSource,
        env_settings: PydanticBaseSettingsSource,
        dotenv_settings: PydanticBaseSettingsSource,
        file_secret_settings: PydanticBaseSettingsSource,
    ) -> tuple[PydanticBaseSettingsSource, ...]:
        # Explicit keyword arguments only: runs must not depend on the environment.
        return (init_settings,)


settings = Settings()
