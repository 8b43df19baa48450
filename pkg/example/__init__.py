# 示例代码包 