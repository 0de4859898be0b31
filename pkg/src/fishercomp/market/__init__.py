"""Market domain model and file formats."""
from .io import (
    allocation_from_dict, allocation_to_dict, dumps_market, load_market, loads_market,
    market_from_dict, market_to_dict, save_market,
)
from .model import (
    INF, Allocation, Market, PreferenceProfile, PricingMode, PricingProfile, PriorityProfile, Revenue,
    available_fraction, bang_per_buck, is_natural, natural_priority, obtainable_fraction,
    preference_profile, revenue, seller_revenue, validate_pricing,
)
