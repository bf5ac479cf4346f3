"""
Base test class for gateway testing.
"""

from pathlib import Path

from engine.tests.base import BaseTest


class BaseGatewayTest(BaseTest):
    """Writes small CSV fixtures into the test's scratch directory."""

    def write(self, name: str, text: str) -> Path:
        path = self.tmp_dir / name
        path.write_text(text, encoding="utf-8")
        return path

    def firms_csv(self, rows: int = 3) -> Path:
        lines = [
            "firm_id,sector,revenue,material_costs,operating_profit,"
            "net_profit,equity,liquidity,retained_earnings"
        ]
        for i in reversed(range(rows)):
            lines.append(f"{i},C10.1.{i},100,40,30,20,50,25,5")
        return self.write("firms.csv", "\n".join(lines) + "\n")


__all__ = ["BaseGatewayTest"]
