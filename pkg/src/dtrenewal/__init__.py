"""Discrete-time renewal processes with Prabhakar-type waiting times, their
continuous-time limits, and random walks on graphs driven by them."""

from __future__ import annotations

from . import counting, ctlimit, dtrw, gfcalc, graph, numkernel, simulate
from .counting import PdtpParams, pdtp_state_panel, pdtp_waiting_pmf
from .ctlimit import CtParams
from .errors import RenewalError
from .gfcalc import CausalSeq
from .graph import Graph, spectral_decompose, transition_matrix
from .numkernel import SeriesValue, mittag_leffler, prabhakar_E

__version__ = "0.1.0"

__all__ = [
    "CausalSeq",
    "CtParams",
    "Graph",
    "PdtpParams",
    "RenewalError",
    "SeriesValue",
    "counting",
    "ctlimit",
    "dtrw",
    "gfcalc",
    "graph",
    "mittag_leffler",
    "numkernel",
    "pdtp_state_panel",
    "pdtp_waiting_pmf",
    "prabhakar_E",
    "simulate",
    "spectral_decompose",
    "transition_matrix",
]
