/* same shape as pciehp.c but the early return unlocks first */
struct slot {
	struct controller *ctrl;
	long last_emi_toggle;
};

int set_lock_status(struct slot *slot, int status)
{
	int retval;

	mutex_lock(&slot->ctrl->crit_sect);
	if ((get_seconds() - slot->last_emi_toggle) < 1) {
		mutex_unlock(&slot->ctrl->crit_sect);
		return -EINVAL;
	}

	retval = write_status(slot, status);
	slot->last_emi_toggle = get_seconds();
	mutex_unlock(&slot->ctrl->crit_sect);
	return retval;
}
