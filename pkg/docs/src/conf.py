# -*- coding: utf-8 -*-
#
# Sphinx configuration for the minkowski-coapprox documentation.
import os
import sys

sys.path.insert(0, os.path.abspath("../../src"))
import sphinx_rtd_theme  # noqa: E402,F401

# -- General configuration ------------------------------------------------

extensions = [
    "sphinx.ext.autodoc",
    "sphinx.ext.napoleon",
    "sphinx.ext.mathjax",
    "sphinx.ext.viewcode",
    "recommonmark",
]

# not installed by docs/requirements.txt
autodoc_mock_imports = ["numpy", "scipy", "rich"]

source_suffix = [".rst", ".md"]
master_doc = "index"

project = "Minkowski Coapproximation"
copyright = "2022, CSIRO"
author = "CSIRO"

# The short X.Y version.
version = "0.1"
# The full version, including alpha/beta/rc tags.
release = "0.1.0"

language = "en"
exclude_patterns = []
pygments_style = "sphinx"

# -- Options for HTML output ----------------------------------------------

html_theme = "sphinx_rtd_theme"
htmlhelp_basename = "minkowski-coapprox-doc"

# -- Options for manual page output ---------------------------------------

man_pages = [
    (
        master_doc,
        "minkowski",
        "minkowski-coapprox Documentation",
        [author],
        1,
    )
]
