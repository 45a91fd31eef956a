""" Update the package version and open a changelog entry for it
"""
import os
from functools import wraps


def read_and_write(func):
    @wraps(func)
    def wrapper(**kwargs):
        path = kwargs["path"]

        with open(path, encoding="utf-8") as fobj:
            data = fobj.readlines()

        func(data, **kwargs)

        with open(path, "w", encoding="utf-8") as fobj:
            fobj.writelines(data)

    return wrapper


@read_and_write
def update_file(data, **kwargs):
    """Replace the value of the assignment starting with key (k) by the value (v)

    Args:
        path (str):
        k (str):
        v (str):
    """
    for i, line in enumerate(data):
        if line.startswith(kwargs["k"]):
            data[i] = """{} = "{}"\n""".format(kwargs["k"], kwargs["v"])


@read_and_write
def update_changelog(data, **kwargs):
    """Insert an empty `### Version` heading above the newest entry unless it exists

    Args:
        path (str):
        v (str):
    """
    heading = "### Version {}\n".format(kwargs["v"])
    if heading in data:
        return
    for i, line in enumerate(data):
        if line.startswith("### Version"):
            data[i:i] = [heading, "\n"]
            return
    data.extend(["\n", heading])


def _parse_args():
    import argparse

    parser = argparse.ArgumentParser(description="Automate the version bump of the pymgan project")
    parser.add_argument("new_version", help="The new version of the package")

    return parser.parse_args()


if __name__ == "__main__":
    args = _parse_args()

    # get current path to find where the script is currently
    script_path = os.path.dirname(os.path.abspath(__file__))

    module_path = os.path.abspath(f"{script_path}/../")

    # update the package __init__ file
    init_file = f"{module_path}/mgan/__init__.py"
    update_file(path=init_file, k="__version__", v=args.new_version)

    changelog = f"{module_path}/CHANGELOG.md"
    update_changelog(path=changelog, v=args.new_version)
