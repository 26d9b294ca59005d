import pytest

from refmodel import demo


@pytest.fixture()
def demo_repo():
    return demo.build_demo_repository()


@pytest.fixture()
def demo_model():
    return demo.build_demo_model()


@pytest.fixture()
def ridge_map():
    return demo.reference_map()
