from .network_params import DerivedConstants, NetworkParams, RateLogBase, derive, kappaAlpha

__all__ = ["DerivedConstants", "NetworkParams", "RateLogBase", "derive", "kappaAlpha"]
