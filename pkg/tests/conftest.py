def pytest_configure(config):
    config.addinivalue_line("markers", "slow: contrôles de recette complets (plusieurs secondes)")
