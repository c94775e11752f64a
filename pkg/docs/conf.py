#!/usr/bin/env python
# -*- coding: utf-8 -*-
#
# ehom documentation build configuration file.
#
# This file is execfile()d with the current directory set to its
# containing dir.
#
# All configuration values have a default; values that are commented out
# serve to show the default.

import ehom

# -- General configuration ---------------------------------------------

extensions = [
    "sphinx.ext.autodoc",
    "sphinx.ext.viewcode",
    "sphinx.ext.mathjax",
    "matplotlib.sphinxext.plot_directive",
    "numpydoc",
    "autodocsumm",
]

autodoc_default_options = {"autosummary": True}

# The suffix(es) of source filenames.
source_suffix = ".rst"

# The master toctree document.
master_doc = "index"

# General information about the project.
project = u"ehom"
copyright = u"2026, The ehom developers"
author = u"The ehom developers"

# The short X.Y version.
version = ehom.__version__
# The full version, including alpha/beta/rc tags.
release = ehom.__version__

language = None

# List of patterns, relative to source directory, that match files and
# directories to ignore when looking for source files.
exclude_patterns = ["_build", "Thumbs.db", ".DS_Store"]

# The name of the Pygments (syntax highlighting) style to use.
pygments_style = "sphinx"

# If true, `todo` and `todoList` produce output, else they produce nothing.
todo_include_todos = False


# -- Options for HTML output -------------------------------------------

html_theme = "alabaster"

html_theme_options = {
    "description": "Extended Hong-Ou-Mandel beamsplitter simulator",
}


# -- Options for HTMLHelp output ---------------------------------------

# Output file base name for HTML help builder.
htmlhelp_basename = "ehomdoc"


# -- Options for LaTeX output ------------------------------------------

latex_elements = {}

# Grouping the document tree into LaTeX files. List of tuples
# (source start file, target name, title, author, documentclass
# [howto, manual, or own class]).
latex_documents = [
    (
        master_doc,
        "ehom.tex",
        "ehom Documentation",
        "The ehom developers",
        "manual",
    ),
]


# -- Options for manual page output ------------------------------------

man_pages = [(master_doc, "ehom", u"ehom Documentation", [author], 1)]


# -- Options for Texinfo output ----------------------------------------

texinfo_documents = [
    (
        master_doc,
        "ehom",
        u"ehom Documentation",
        author,
        "ehom",
        "Photon statistics at a lossless beamsplitter.",
    ),
]
