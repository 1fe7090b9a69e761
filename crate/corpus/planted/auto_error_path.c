/* planted: the allocation failure path returns with dev_mutex held */
int dev_open(struct device *dev)
{
	char *buf;

	mutex_lock(&dev_mutex);
	buf = kmalloc(64);
	if (!buf)
		return -ENOMEM;
	dev->buf = buf;
	mutex_unlock(&dev_mutex);
	return 0;
}
