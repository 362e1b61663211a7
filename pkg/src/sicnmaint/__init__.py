"""BGP-driven anomaly identification and self-maintenance planning for
satellite-integrated community networks.

Subpackages:
    bgp        -- BGP UPDATE records, MRT binary codec, plain-text log format
    features   -- time windowing and the 37-feature reduction used by the classifiers
    learn      -- from-scratch classifiers with a fit/predict estimator API
    simnet     -- topology model and synthetic labeled traffic generator
Modules:
    hierarchy  -- two-step identification pipeline, localization, flat baseline
    mitigation -- diagnosis-to-mitigation-plan rule engine
    experiment -- end-to-end reproducible experiment runner
    cli        -- command-line entry points
"""

__version__ = "0.1.0"
