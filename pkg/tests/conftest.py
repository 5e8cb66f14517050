import pytest

from folksodriven.fixtures import seed_edit_script, seed_tags, seed_templates
from folksodriven.journal import apply_op
from folksodriven.ontology import empty_kb


@pytest.fixture(scope="session")
def news_kb():
    kb = empty_kb()
    for op, args in seed_edit_script():
        kb = apply_op(kb, op, args)
    return kb


@pytest.fixture(scope="session")
def news_tags():
    return seed_tags()


@pytest.fixture(scope="session")
def news_templates():
    return seed_templates()
