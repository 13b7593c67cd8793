# This file is part of xopspy.
# You should have received the xopspy LICENSE file with this project.
"""Support module to run xopspy as a module:

.. code-block:: bash
    :caption: Options to run the xopspy CLI

    # Run as a module (implemented in xopspy/__main__.py)
    python -m xopspy

    # Run as "program" (see project.scripts in pyproject.toml)
    xopspy
"""

from xopspy.command.cli import cli

cli()
