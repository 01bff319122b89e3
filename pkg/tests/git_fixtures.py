"""Small throw-away git repositories for the tests, built with GitPython."""
import shutil
import git # Package: GitPython
from pathlib import Path

HAS_GIT = shutil.which("git") is not None

# (message, {path: content}, author timestamp, author email)
DEFAULT_COMMITS = [
    ("Add parser", {"src/a.py": "1\n2\n3\n",
                    "tests/test_a.py": "assert True\n"}, 1546300800,
     "alice@example.com"),
    ("Fix bug in parser", {"src/a.py": "1\nX\n3\n4\n"}, 1546387200,
     "Bob@Example.com"),
]


def make_repository(path, commits=DEFAULT_COMMITS) -> git.Repo:
    path = Path(path)
    repo = git.Repo.init(path)
    with repo.config_writer() as writer:
        writer.set_value("user", "name", "Test")
        writer.set_value("user", "email", "test@example.com")
    for message, files, timestamp, email in commits:
        for rel, content in files.items():
            target = path / rel
            target.parent.mkdir(parents=True, exist_ok=True)
            target.write_text(content, encoding="utf-8")
            repo.index.add([rel])
        actor = git.Actor(email.split("@")[0], email)
        date = "%d +0000" % timestamp
        repo.index.commit(message,
                          author=actor,
                          committer=actor,
                          author_date=date,
                          commit_date=date)
    return repo
