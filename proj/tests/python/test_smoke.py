import entroscope


def test_module_imports():
    assert entroscope is not None
