__all__ = ("build_banner",)


def build_banner(version: str) -> str:
    return rf"""
   ██╗    ██╗██╗ ██████╗██╗      █████╗ ██████╗
   ██║    ██║██║██╔════╝██║     ██╔══██╗██╔══██╗
   ██║ █╗ ██║██║██║     ██║     ███████║██████╔╝
   ██║███╗██║██║██║     ██║     ██╔══██║██╔══██╗
   ╚███╔███╔╝██║╚██████╗███████╗██║  ██║██████╔╝
    ╚══╝╚══╝ ╚═╝ ╚═════╝╚══════╝╚═╝  ╚═╝╚═════╝   {version}
"""
