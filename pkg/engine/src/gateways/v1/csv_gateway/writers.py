"""
CSV and JSON writers. All output is deterministic: fixed column order,
fixed float format and ``\\n`` line endings.
"""

import json
import logging
from pathlib import Path
from typing import Any, Iterable, List, Optional, Sequence, Union

import numpy as np
import pandas as pd
from pydantic import BaseModel

from ....models import (
    BankRegister,
    CriticalityTable,
    DirectShockPoint,
    EmissionVector,
    FirmBook,
    SupplyNetwork,
)
from ....schemas.v1.reports import CellResult, EsriEntry
from ....utils.logger import get_logger

PathLike = Union[str, Path]

# Input files must round-trip bit-exactly, reports only need to be readable.
DATA_FLOAT_FORMAT = "%.17g"
REPORT_FLOAT_FORMAT = "%.15g"

SWEEP_COLUMNS = [
    "price",
    "mode",
    "fn",
    "direct_output_loss",
    "total_output_loss",
    "direct_bank_loss",
    "total_bank_loss",
    "amplification_output",
    "amplification_bank",
]

DIRECT_SWEEP_COLUMNS = ["price", "direct_output_loss", "direct_defaults_count"]


class CsvWriter:
    """Gateway writing engine models and reports to disk."""

    logger: logging.Logger = get_logger(__name__)

    @classmethod
    def _write_frame(
        cls,
        path: PathLike,
        frame: pd.DataFrame,
        float_format: str = REPORT_FLOAT_FORMAT,
        header_lines: Optional[Sequence[str]] = None,
    ) -> Path:
        target = Path(path)
        target.parent.mkdir(parents=True, exist_ok=True)
        body = frame.to_csv(index=False, float_format=float_format, lineterminator="\n")
        prefix = "".join(f"# {line}\n" for line in header_lines or ())
        with open(target, "w", encoding="utf-8", newline="") as f:
            f.write(prefix + body)
        cls.logger.debug(
            "Wrote CSV", extra={"data": {"path": str(target), "rows": len(frame)}}
        )
        return target

    @classmethod
    def write_firms(cls, path: PathLike, book: FirmBook) -> Path:
        frame = pd.DataFrame(
            {
                "firm_id": np.arange(book.n),
                "sector": book.sectors,
                "revenue": book.revenue,
                "material_costs": book.material_costs,
                "operating_profit": book.operating_profit,
                "net_profit": book.net_profit,
                "equity": book.equity,
                "liquidity": book.liquidity,
                "retained_earnings": book.retained_earnings,
            }
        )
        return cls._write_frame(path, frame, DATA_FLOAT_FORMAT)

    @classmethod
    def write_edges(cls, path: PathLike, network: SupplyNetwork) -> Path:
        frame = pd.DataFrame(
            {
                "supplier_id": network.supplier,
                "buyer_id": network.buyer,
                "value": network.value,
            }
        )
        return cls._write_frame(path, frame, DATA_FLOAT_FORMAT)

    @classmethod
    def write_criticality(cls, path: PathLike, table: CriticalityTable) -> Path:
        rows = sorted(table.entries.items())
        frame = pd.DataFrame(
            {
                "buyer_sector": [pair[0] for pair, _ in rows],
                "supplier_sector": [pair[1] for pair, _ in rows],
                "essential": [int(flag) for _, flag in rows],
            },
            columns=["buyer_sector", "supplier_sector", "essential"],
        )
        return cls._write_frame(path, frame, DATA_FLOAT_FORMAT)

    @classmethod
    def write_banks(
        cls, banks_path: PathLike, loans_path: PathLike, register: BankRegister
    ) -> List[Path]:
        banks = pd.DataFrame(
            {"bank_id": np.arange(register.m), "equity": register.equity}
        )
        # principal and write_off share one sparsity pattern
        coo = register.principal.tocoo()
        write_off = register.write_off.tocoo().data
        lgd = np.divide(
            write_off, coo.data, out=np.ones(len(coo.data)), where=coo.data > 0
        )
        loans = pd.DataFrame(
            {
                "firm_id": coo.row.astype(np.int64),
                "bank_id": coo.col.astype(np.int64),
                "principal": coo.data,
                "lgd": lgd,
            }
        ).sort_values(["firm_id", "bank_id"], kind="stable")
        return [
            cls._write_frame(banks_path, banks, DATA_FLOAT_FORMAT),
            cls._write_frame(loans_path, loans, DATA_FLOAT_FORMAT),
        ]

    @classmethod
    def write_emissions(cls, path: PathLike, emissions: EmissionVector) -> Path:
        frame = pd.DataFrame(
            {"firm_id": np.arange(emissions.n), "emissions_t": emissions.emissions}
        )
        return cls._write_frame(path, frame, DATA_FLOAT_FORMAT)

    @classmethod
    def write_retained_costs(cls, path: PathLike, retained: np.ndarray) -> Path:
        frame = pd.DataFrame(
            {"firm_id": np.arange(len(retained)), "retained_cost": retained}
        )
        return cls._write_frame(path, frame)

    @classmethod
    def write_sweep(
        cls,
        path: PathLike,
        cells: Iterable[CellResult],
        header_lines: Optional[Sequence[str]] = None,
    ) -> Path:
        rows = [
            {
                "price": cell.price,
                "mode": cell.mode,
                "fn": cell.fn,
                "direct_output_loss": cell.direct_output_loss,
                "total_output_loss": cell.total_output_loss,
                "direct_bank_loss": cell.direct_bank_loss,
                "total_bank_loss": cell.total_bank_loss,
                "amplification_output": cell.amplification_output,
                "amplification_bank": cell.amplification_bank,
            }
            for cell in cells
            if cell.success
        ]
        frame = pd.DataFrame(rows, columns=SWEEP_COLUMNS)
        return cls._write_frame(path, frame, header_lines=header_lines)

    @classmethod
    def write_direct_sweep(
        cls,
        path: PathLike,
        points: Iterable[DirectShockPoint],
        header_lines: Optional[Sequence[str]] = None,
    ) -> Path:
        rows = [
            {
                "price": point.price,
                "direct_output_loss": point.output_loss,
                "direct_defaults_count": point.default_count,
            }
            for point in points
        ]
        frame = pd.DataFrame(rows, columns=DIRECT_SWEEP_COLUMNS)
        return cls._write_frame(path, frame, header_lines=header_lines)

    @classmethod
    def write_bank_losses(
        cls,
        path: PathLike,
        cells: Iterable[CellResult],
        header_lines: Optional[Sequence[str]] = None,
    ) -> Path:
        rows = []
        for cell in cells:
            if not cell.success:
                continue
            rows.append(
                {
                    "price": cell.price,
                    "system_direct_loss": cell.direct_bank_loss,
                    "system_total_loss": cell.total_bank_loss,
                    "fn": cell.fn,
                    "pass_through": cell.mode == "pass_through",
                }
            )
        columns = [
            "price",
            "system_direct_loss",
            "system_total_loss",
            "fn",
            "pass_through",
        ]
        frame = pd.DataFrame(rows, columns=columns)
        return cls._write_frame(path, frame, header_lines=header_lines)

    @classmethod
    def write_sector_losses(
        cls,
        path: PathLike,
        cells: Iterable[CellResult],
        header_lines: Optional[Sequence[str]] = None,
    ) -> Path:
        rows = [
            {
                "price": cell.price,
                "mode": cell.mode,
                "fn": cell.fn,
                "section": entry.section,
                "output_loss": entry.output_loss,
                "bank_loss": entry.bank_loss,
            }
            for cell in cells
            if cell.success
            for entry in cell.sections
        ]
        columns = ["price", "mode", "fn", "section", "output_loss", "bank_loss"]
        frame = pd.DataFrame(rows, columns=columns)
        return cls._write_frame(path, frame, header_lines=header_lines)

    @classmethod
    def write_esri(cls, path: PathLike, entries: Sequence[EsriEntry]) -> Path:
        frame = pd.DataFrame(
            [entry.model_dump() for entry in entries],
            columns=["firm_id", "esri", "fsri"],
        )
        return cls._write_frame(path, frame)

    @classmethod
    def write_trace(cls, path: PathLike, trace: Sequence[float]) -> Path:
        frame = pd.DataFrame(
            {"iteration": np.arange(1, len(trace) + 1), "max_delta": list(trace)}
        )
        return cls._write_frame(path, frame)

    @classmethod
    def write_json(cls, path: PathLike, payload: Any) -> Path:
        target = Path(path)
        target.parent.mkdir(parents=True, exist_ok=True)
        if isinstance(payload, BaseModel):
            payload = payload.model_dump(mode="json")
        elif isinstance(payload, list):
            payload = [
                p.model_dump(mode="json") if isinstance(p, BaseModel) else p
                for p in payload
            ]
        with open(target, "w", encoding="utf-8", newline="") as f:
            json.dump(payload, f, indent=2, sort_keys=True, allow_nan=False)
            f.write("\n")
        return target


__all__ = [
    "CsvWriter",
    "SWEEP_COLUMNS",
    "DIRECT_SWEEP_COLUMNS",
    "DATA_FLOAT_FORMAT",
    "REPORT_FLOAT_FORMAT",
]
