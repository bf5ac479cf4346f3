from typing import Dict, List, Optional

from pydantic import BaseModel, Field


class BankLossEntry(BaseModel):
    """Losses of one bank as fractions of its own equity."""

    bank_id: int
    direct: float
    indirect: float
    total: float


class SectionLossEntry(BaseModel):
    """Output and bank losses caused by firms of one section letter."""

    section: str
    output_loss: float = Field(..., description="Share of total network sales lost")
    bank_loss: float = Field(..., description="Share of total bank equity lost")


class CellResult(BaseModel):
    """Outcome of one (price, mode, production function) sweep cell."""

    success: bool
    message: Optional[str] = None
    price: float
    mode: str
    fn: str
    direct_output_loss: Optional[float] = None
    total_output_loss: Optional[float] = None
    indirect_output_loss: Optional[float] = None
    direct_bank_loss: Optional[float] = None
    indirect_bank_loss: Optional[float] = None
    total_bank_loss: Optional[float] = None
    direct_defaults: int = 0
    indirect_defaults: int = 0
    passthrough_iterations: int = 0
    passthrough_residual: float = 0.0
    contagion_iterations: int = 0
    banks: List[BankLossEntry] = Field(default_factory=list)
    sections: List[SectionLossEntry] = Field(default_factory=list)
    buckets: Dict[str, float] = Field(
        default_factory=dict, description="System bank loss per carbon-risk bucket"
    )
    trace: List[float] = Field(default_factory=list)

    @property
    def cell_id(self) -> str:
        return f"{self.price:g}_{self.mode}_{self.fn}"

    @property
    def amplification_output(self) -> Optional[float]:
        return _ratio(self.total_output_loss, self.direct_output_loss)

    @property
    def amplification_bank(self) -> Optional[float]:
        return _ratio(self.total_bank_loss, self.direct_bank_loss)


def _ratio(total: Optional[float], direct: Optional[float]) -> Optional[float]:
    if total is None or not direct:
        return None
    return total / direct


class SweepResponse(BaseModel):
    """All cells of a sweep in deterministic order."""

    success: bool
    message: Optional[str] = None
    cells: List[CellResult] = Field(default_factory=list)
    dominance_violations: List[str] = Field(default_factory=list)

    @property
    def exit_code(self) -> int:
        return 0 if self.success else 1


class NetworkSummary(BaseModel):
    """Size of a (possibly thresholded) network and of the exposures it carries."""

    label: str
    min_edge_value: float = 0.0
    firms: int
    active_firms: int = Field(..., description="Firms with at least one link")
    links: int
    total_sales: float
    retained_value_fraction: float = 1.0
    eligible_loan_volume: float = Field(
        ..., description="Loans of default-eligible active borrowers"
    )
    total_emissions: float


class DistributorSummaryEntry(BaseModel):
    fuel: str
    sector: str
    firms: int
    out_links: int
    out_strength: float


class EmissionStatistics(BaseModel):
    """Headline figures of an emission estimate."""

    firms: int
    emitting_firms: int
    emitting_share: float = Field(..., description="Share of firms directly exposed")
    total_emissions: float
    covered_gas_share: float
    covered_oil_share: float
    dropped_emissions: float
    cpr_defined: int = Field(..., description="Firms with emissions and profit > 0")
    breakeven_quantiles: Dict[str, float] = Field(default_factory=dict)


class EsriEntry(BaseModel):
    firm_id: int
    esri: float
    fsri: Optional[float] = None


class EsriResponse(BaseModel):
    success: bool
    message: Optional[str] = None
    fn: str
    entries: List[EsriEntry] = Field(default_factory=list)


class GenerateResponse(BaseModel):
    success: bool
    message: Optional[str] = None
    files: Dict[str, str] = Field(default_factory=dict)
    fitted_tail_exponent: Optional[float] = None
    ks_distance: Optional[float] = None


__all__ = [
    "BankLossEntry",
    "SectionLossEntry",
    "CellResult",
    "SweepResponse",
    "NetworkSummary",
    "DistributorSummaryEntry",
    "EmissionStatistics",
    "EsriEntry",
    "EsriResponse",
    "GenerateResponse",
]
