"""
CSV readers for firms, edges, criticality, banks, loans and emissions.
"""

import logging
from pathlib import Path
from typing import Dict, Optional, Sequence, Union

import numpy as np
import pandas as pd

from ....errors import InputDataError
from ....models import (
    BankRegister,
    CriticalityTable,
    EmissionVector,
    FirmBook,
    SupplyNetwork,
)
from ....utils.logger import get_logger
from ....utils.sectors import normalize_sector

PathLike = Union[str, Path]

FIRM_COLUMNS = [
    "firm_id",
    "sector",
    "revenue",
    "material_costs",
    "operating_profit",
    "net_profit",
    "equity",
    "liquidity",
    "retained_earnings",
]
EDGE_COLUMNS = ["supplier_id", "buyer_id", "value"]
CRITICALITY_COLUMNS = ["buyer_sector", "supplier_sector", "essential"]
BANK_COLUMNS = ["bank_id", "equity"]
LOAN_COLUMNS = ["firm_id", "bank_id", "principal"]
EMISSION_COLUMNS = ["firm_id", "emissions_t"]


def _parse_float(text: str) -> float:
    try:
        return float(text)
    except ValueError:
        return float("nan")


class CsvReader:
    """Gateway turning CSV files into engine models. Failures raise InputDataError."""

    logger: logging.Logger = get_logger(__name__)

    @classmethod
    def _read_frame(cls, path: PathLike, required: Sequence[str]) -> pd.DataFrame:
        try:
            frame = pd.read_csv(
                path,
                dtype=str,
                keep_default_na=False,
                skipinitialspace=True,
                comment="#",
            )
        except FileNotFoundError as e:
            raise InputDataError("file not found", path=str(path)) from e
        except pd.errors.EmptyDataError as e:
            raise InputDataError(
                "file is empty, header required", path=str(path)
            ) from e
        except pd.errors.ParserError as e:
            raise InputDataError(f"malformed CSV: {e}", path=str(path)) from e

        frame.columns = [str(c).strip() for c in frame.columns]
        missing = [c for c in required if c not in frame.columns]
        if missing:
            raise InputDataError(
                f"missing columns {missing}", path=str(path), line=1
            )
        return frame

    @classmethod
    def _numeric(
        cls, frame: pd.DataFrame, column: str, path: PathLike, integer: bool = False
    ) -> np.ndarray:
        # float() rounds correctly; pandas' fast parser can be off by an ulp
        values = frame[column].str.strip().map(_parse_float).astype(float)
        bad = ~np.isfinite(values.to_numpy())
        if integer:
            bad |= values.fillna(0).to_numpy() % 1 != 0
        if bad.any():
            row = int(np.flatnonzero(bad)[0])
            raise InputDataError(
                f"invalid {column} value '{frame[column].iloc[row]}'",
                path=str(path),
                line=row + 2,
            )
        if integer:
            return values.to_numpy().astype(np.int64)
        return values.to_numpy(dtype=float)

    @classmethod
    def _dense_ids(cls, ids: np.ndarray, path: PathLike, what: str) -> np.ndarray:
        """Row order that sorts ``ids``, which must be a permutation of 0..n-1."""
        order = np.argsort(ids, kind="stable")
        if not np.array_equal(ids[order], np.arange(len(ids))):
            raise InputDataError(
                f"{what} ids must be unique and contiguous 0..n-1", path=str(path)
            )
        return order

    @classmethod
    def read_firms(cls, path: PathLike) -> FirmBook:
        frame = cls._read_frame(path, FIRM_COLUMNS)
        ids = cls._numeric(frame, "firm_id", path, integer=True)
        order = cls._dense_ids(ids, path, "firm")
        columns: Dict[str, np.ndarray] = {
            name: cls._numeric(frame, name, path)[order] for name in FIRM_COLUMNS[2:]
        }
        sectors = [normalize_sector(code) for code in frame["sector"].to_numpy()[order]]
        book = FirmBook.from_columns(sectors=sectors, **columns)
        cls.logger.info(
            "Loaded firms", extra={"data": {"path": str(path), "firms": book.n}}
        )
        return book

    @classmethod
    def read_edges(cls, path: PathLike, n_firms: int) -> SupplyNetwork:
        frame = cls._read_frame(path, EDGE_COLUMNS)
        supplier = cls._numeric(frame, "supplier_id", path, integer=True)
        buyer = cls._numeric(frame, "buyer_id", path, integer=True)
        value = cls._numeric(frame, "value", path)

        for name, ids in (("supplier_id", supplier), ("buyer_id", buyer)):
            dangling = (ids < 0) | (ids >= n_firms)
            if dangling.any():
                row = int(np.flatnonzero(dangling)[0])
                raise InputDataError(
                    f"{name} {ids[row]} is not a known firm",
                    path=str(path),
                    line=row + 2,
                )
        loops = supplier == buyer
        if loops.any():
            row = int(np.flatnonzero(loops)[0])
            raise InputDataError("self-loop edge", path=str(path), line=row + 2)
        non_positive = value <= 0
        if non_positive.any():
            row = int(np.flatnonzero(non_positive)[0])
            raise InputDataError(
                "edge value must be > 0", path=str(path), line=row + 2
            )

        network = SupplyNetwork.from_edges(n_firms, supplier, buyer, value)
        cls.logger.info(
            "Loaded edges",
            extra={
                "data": {
                    "path": str(path),
                    "rows": len(frame),
                    "edges": network.edge_count,
                }
            },
        )
        return network

    @classmethod
    def read_criticality(cls, path: PathLike) -> CriticalityTable:
        frame = cls._read_frame(path, CRITICALITY_COLUMNS)
        flags = cls._numeric(frame, "essential", path, integer=True)
        invalid = (flags != 0) & (flags != 1)
        if invalid.any():
            row = int(np.flatnonzero(invalid)[0])
            raise InputDataError(
                "essential must be 0 or 1", path=str(path), line=row + 2
            )
        entries = {
            (normalize_sector(b), normalize_sector(s)): bool(flag)
            for b, s, flag in zip(
                frame["buyer_sector"], frame["supplier_sector"], flags
            )
        }
        return CriticalityTable(entries=entries)

    @classmethod
    def read_bank_equity(cls, path: PathLike) -> np.ndarray:
        frame = cls._read_frame(path, BANK_COLUMNS)
        ids = cls._numeric(frame, "bank_id", path, integer=True)
        order = cls._dense_ids(ids, path, "bank")
        equity = cls._numeric(frame, "equity", path)[order]
        if np.any(equity <= 0):
            raise InputDataError("bank equity must be > 0", path=str(path))
        return equity

    @classmethod
    def read_banks(
        cls, banks_path: PathLike, loans_path: PathLike, n_firms: int
    ) -> BankRegister:
        equity = cls.read_bank_equity(banks_path)
        frame = cls._read_frame(loans_path, LOAN_COLUMNS)
        firm = cls._numeric(frame, "firm_id", loans_path, integer=True)
        bank = cls._numeric(frame, "bank_id", loans_path, integer=True)
        principal = cls._numeric(frame, "principal", loans_path)
        lgd: Optional[np.ndarray] = None
        if "lgd" in frame.columns:
            lgd = cls._numeric(frame, "lgd", loans_path)

        unknown_firm = (firm < 0) | (firm >= n_firms)
        unknown_bank = (bank < 0) | (bank >= len(equity))
        for mask, what in ((unknown_firm, "firm_id"), (unknown_bank, "bank_id")):
            if mask.any():
                row = int(np.flatnonzero(mask)[0])
                raise InputDataError(
                    f"loan references unknown {what}",
                    path=str(loans_path),
                    line=row + 2,
                )

        register = BankRegister.from_loans(n_firms, equity, firm, bank, principal, lgd)
        cls.logger.info(
            "Loaded banks",
            extra={"data": {"banks": register.m, "loans": register.principal.nnz}},
        )
        return register

    @classmethod
    def read_emissions(cls, path: PathLike, n_firms: int) -> EmissionVector:
        frame = cls._read_frame(path, EMISSION_COLUMNS)
        ids = cls._numeric(frame, "firm_id", path, integer=True)
        if len(ids) != n_firms:
            raise InputDataError(
                f"expected {n_firms} emission rows, got {len(ids)}", path=str(path)
            )
        order = cls._dense_ids(ids, path, "firm")
        emissions = cls._numeric(frame, "emissions_t", path)[order]
        if np.any(emissions < 0):
            raise InputDataError("emissions must be >= 0", path=str(path))
        return EmissionVector.explicit(emissions)


__all__ = [
    "CsvReader",
    "FIRM_COLUMNS",
    "EDGE_COLUMNS",
    "CRITICALITY_COLUMNS",
    "BANK_COLUMNS",
    "LOAN_COLUMNS",
    "EMISSION_COLUMNS",
]
