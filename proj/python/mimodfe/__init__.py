"""Joint transceiver design and MMSE-DFE simulation for multiple-access
ISI MIMO channels.

The heavy lifting lives in the compiled ``_core`` extension; this package
re-exports its public surface.
"""

from ._core import (  # noqa: F401
    BerRecord,
    ChannelSet,
    ConfigError,
    Constellation,
    DesignResult,
    DetectionResult,
    DfeReceiver,
    DimensionError,
    DomainError,
    Error,
    FactorizationError,
    HermitianEig,
    InverseWaterfillResult,
    IoError,
    IsiChannel,
    LinearReceiver,
    Modulation,
    QrsFactors,
    RankError,
    ReceiverKind,
    Residual,
    SimConfig,
    SweepResult,
    UserDesign,
    UserDfe,
    VerificationReport,
    VerificationSummary,
    build_linear_receiver,
    build_receiver,
    cholesky_upper,
    design_transceivers,
    detect,
    dmt_matrix,
    emit_csv,
    hermitian_eig,
    hermitian_sqrt,
    inverse_waterfill,
    linear_mmse_detect,
    qrs_equal_diagonal,
    read_ber_csv,
    run_sweep,
    sweep_channels,
    toeplitz_matrix,
    verify_design,
)
from ._core import __version__  # noqa: F401
