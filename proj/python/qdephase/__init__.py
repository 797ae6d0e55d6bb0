# SPDX-License-Identifier: Apache-2.0
"""Collective dephasing of few-qubit states: channel dynamics, genuine
multipartite negativity (witness SDP) and Svetlichny nonlocality."""

from ._core import (
    DephasingChannel,
    GmeResult,
    QdephaseError,
    SvetlichnySetting,
    WitnessCertificate,
    analytic_oracle,
    bipartite_negativity,
    bipartitions,
    chi4,
    cluster4,
    death_time,
    derive_seed,
    dicke24,
    genuine_negativity,
    ghz,
    ghz_family_setting,
    load_certificate,
    load_state,
    optimize_angles,
    random_pure,
    save_certificate,
    save_state,
    singlet4,
    svetlichny_expectation,
    svetlichny_operator,
    verify_certificate,
    w,
    w_family_setting,
    w_magic_angle,
    white_noise_mix,
)

__all__ = [
    "DephasingChannel",
    "GmeResult",
    "QdephaseError",
    "SvetlichnySetting",
    "WitnessCertificate",
    "analytic_oracle",
    "bipartite_negativity",
    "bipartitions",
    "chi4",
    "cluster4",
    "death_time",
    "derive_seed",
    "dicke24",
    "genuine_negativity",
    "ghz",
    "ghz_family_setting",
    "load_certificate",
    "load_state",
    "optimize_angles",
    "random_pure",
    "save_certificate",
    "save_state",
    "singlet4",
    "svetlichny_expectation",
    "svetlichny_operator",
    "verify_certificate",
    "w",
    "w_family_setting",
    "w_magic_angle",
    "white_noise_mix",
]
